"""Masked-language-model backends.

A candidate phrase is scored by replacing the template's {SLOT} with as
many mask tokens as the candidate tokenizes to, running the encoder
once, and averaging the log-probabilities of the candidate's tokens at
the masked positions. Inference is deterministic: eval mode, no
sampling, no dropout.

`random-tiny` is a seeded randomly initialized miniature BERT with a
character-level vocabulary; it exists so the service (and its tests)
run without downloading pretrained weights. Scores from it are
deterministic but carry no linguistic meaning.
"""

from __future__ import annotations

import string
import tempfile
import threading
from pathlib import Path

import torch

SLOT = "{SLOT}"
RANDOM_TINY = "random-tiny"
RANDOM_TINY_SEED = 1234


class ScoringError(ValueError):
    """Request content that cannot be scored (bad candidate, too long)."""


def _tiny_vocab_file() -> str:
    chars = list(string.ascii_lowercase + string.digits + ".,!?'-")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += chars + [f"##{c}" for c in chars]
    tmp = Path(tempfile.mkdtemp(prefix="mlm-tiny-vocab-")) / "vocab.txt"
    tmp.write_text("".join(t + "\n" for t in vocab), encoding="utf-8")
    return str(tmp)


def _build_random_tiny():
    from transformers import BertConfig, BertForMaskedLM, BertTokenizer

    tokenizer = BertTokenizer(vocab_file=_tiny_vocab_file(), do_lower_case=True)
    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=256,
    )
    torch.manual_seed(RANDOM_TINY_SEED)
    model = BertForMaskedLM(config)
    return tokenizer, model


class TransformersMlmBackend:
    def __init__(self, model_id: str, batch_size: int = 16):
        self.model_id = model_id
        self.batch_size = max(1, batch_size)
        if model_id == RANDOM_TINY:
            self.tokenizer, self.model = _build_random_tiny()
        else:
            from transformers import AutoModelForMaskedLM, AutoTokenizer

            self.tokenizer = AutoTokenizer.from_pretrained(model_id)
            self.model = AutoModelForMaskedLM.from_pretrained(model_id)
        self.model.eval()
        self._lock = threading.Lock()

    # ------------------------------------------------------------------

    def _candidate_ids(self, candidate: str) -> list[int]:
        ids = self.tokenizer.encode(candidate, add_special_tokens=False)
        if not ids:
            raise ScoringError(f"candidate {candidate!r} tokenizes to nothing")
        return ids

    def _filled_template(self, template: str, n_masks: int) -> str:
        masks = " ".join([self.tokenizer.mask_token] * n_masks)
        return template.replace(SLOT, masks)

    def score(self, template: str, candidates: list[str]) -> list[float]:
        """Mean log-probability of each candidate in the filled template."""
        target_ids = [self._candidate_ids(c) for c in candidates]
        scores: list[float] = []
        with self._lock:
            for start in range(0, len(candidates), self.batch_size):
                batch_targets = target_ids[start : start + self.batch_size]
                scores.extend(self._score_batch(template, batch_targets))
        return scores

    def _score_batch(self, template: str, batch_targets: list[list[int]]) -> list[float]:
        texts = [self._filled_template(template, len(ids)) for ids in batch_targets]
        encoded = self.tokenizer(texts, padding=True, return_tensors="pt")
        max_len = getattr(self.model.config, "max_position_embeddings", 512)
        if encoded["input_ids"].shape[1] > max_len:
            raise ScoringError("filled template exceeds the model's maximum length")
        mask_id = self.tokenizer.mask_token_id
        with torch.no_grad():
            logits = self.model(**encoded).logits
        log_probs = torch.log_softmax(logits, dim=-1)

        out = []
        for row, ids in enumerate(batch_targets):
            positions = (encoded["input_ids"][row] == mask_id).nonzero(as_tuple=True)[0]
            if positions.numel() != len(ids):
                raise ScoringError("mask positions lost; template too long?")
            per_token = log_probs[row, positions, torch.tensor(ids)]
            out.append(float(per_token.mean()))
        return out
