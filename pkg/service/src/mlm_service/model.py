"""Model wrapper: encodes word-level mask queries and scores them.

For each masked word the full subword span is replaced by [MASK] pieces
(one per piece of the TARGET word, since that is the word whose joint
probability is requested); a query item with two masked words masks the
union of both spans in a single forward pass.  The returned value per
masked position is the sum of the target pieces' log-softmax scores,
natural log, hence always <= 0.
"""

from __future__ import annotations

from typing import Sequence

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer

from mlm_service.alignment import TokenizationMismatch, align_words_to_subwords


class ItemTooLong(Exception):
    """Encoded item exceeds the model's position limit."""


class ServedModel:
    """A loaded checkpoint plus its tokenizer, inference in eval mode."""

    def __init__(self, model_name_or_path: str, device: str = "cpu"):
        self.model_id = str(model_name_or_path)
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(model_name_or_path)
        self.model = (
            AutoModelForMaskedLM.from_pretrained(model_name_or_path).to(device).eval()
        )
        self.position_limit = int(self.model.config.max_position_embeddings)
        # word-level budget advertised to clients; CLS/SEP are reserved
        self.max_tokens = self.position_limit - 2

    def _encode_item(
        self,
        tokens: Sequence[str],
        masked_positions: Sequence[int],
        targets: Sequence[str],
    ) -> tuple[list[int], list[tuple[int, list[int]]]]:
        """-> (input ids, per masked position (first slot index, target piece ids))."""
        pieces, spans = align_words_to_subwords(tokens, self.tokenizer)
        piece_ids_flat = self.tokenizer.convert_tokens_to_ids(pieces)
        target_pieces: dict[int, list[int]] = {}
        for position, target in zip(masked_positions, targets):
            target_split = self.tokenizer.tokenize(target)
            if not target_split:
                raise TokenizationMismatch(f"target {target!r} produced no pieces")
            target_pieces[position] = self.tokenizer.convert_tokens_to_ids(target_split)

        mask_id = self.tokenizer.mask_token_id
        ids: list[int] = [self.tokenizer.cls_token_id]
        slots: dict[int, tuple[int, list[int]]] = {}
        for word_index in range(len(tokens)):
            if word_index in target_pieces:
                piece_ids = target_pieces[word_index]
                slots[word_index] = (len(ids), piece_ids)
                ids.extend([mask_id] * len(piece_ids))
            else:
                start, end = spans[word_index]
                ids.extend(piece_ids_flat[start:end])
        ids.append(self.tokenizer.sep_token_id)
        if len(ids) > self.position_limit:
            raise ItemTooLong(
                f"{len(ids)} subword positions exceed the model limit "
                f"{self.position_limit}"
            )
        return ids, [slots[p] for p in masked_positions]

    def score_items(
        self, items: Sequence[tuple[Sequence[str], Sequence[int], Sequence[str]]]
    ) -> list[list[float]]:
        """One forward pass over the padded batch; logprobs per masked position."""
        if not items:
            return []
        encoded = [self._encode_item(*item) for item in items]
        longest = max(len(ids) for ids, _ in encoded)
        pad = self.tokenizer.pad_token_id or 0
        input_ids = torch.tensor(
            [ids + [pad] * (longest - len(ids)) for ids, _ in encoded],
            device=self.device,
        )
        attention = torch.tensor(
            [[1] * len(ids) + [0] * (longest - len(ids)) for ids, _ in encoded],
            device=self.device,
        )
        with torch.no_grad():
            logits = self.model(input_ids=input_ids, attention_mask=attention).logits
        log_probs = torch.log_softmax(logits, dim=-1)
        results: list[list[float]] = []
        for row, (_, slots) in enumerate(encoded):
            row_out = []
            for start, piece_ids in slots:
                total = 0.0
                for offset, piece_id in enumerate(piece_ids):
                    total += float(log_probs[row, start + offset, piece_id])
                row_out.append(total)
            results.append(row_out)
        return results
