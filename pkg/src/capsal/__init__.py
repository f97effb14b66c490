"""capsal: entity saliency analytics for multilingual image captions."""

__version__ = "0.1.0"
