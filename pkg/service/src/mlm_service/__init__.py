"""Inference sidecar: masked-word log-probabilities from a pretrained MLM.

Speaks the /v1 wire protocol (health, info, mask_logprob) and handles the
word-to-subword alignment so clients can stay word-level.
"""

from mlm_service.alignment import TokenizationMismatch, align_words_to_subwords
from mlm_service.app import create_app
from mlm_service.model import ItemTooLong, ServedModel

__version__ = "0.1.0"
