from .tree import Synset, SynsetId, SynsetTree
from .wndb import parse_wordnet
from .edits import EditKind, OntologyEdit, apply_edits, parse_edit_script

__all__ = [
    "Synset",
    "SynsetId",
    "SynsetTree",
    "parse_wordnet",
    "EditKind",
    "OntologyEdit",
    "apply_edits",
    "parse_edit_script",
]
