import pytest
import torch
from transformers import BertConfig, BertForMaskedLM, BertTokenizer

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "cat", "dog", "bird", "sat", "on", "mat", "ran",
    "play", "##ing", "##s", "big",
]


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    """A tiny randomly initialized word-piece MLM saved to disk."""
    directory = tmp_path_factory.mktemp("tiny-mlm")
    (directory / "vocab.txt").write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    tokenizer = BertTokenizer(str(directory / "vocab.txt"), do_lower_case=True)
    tokenizer.save_pretrained(str(directory))
    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    BertForMaskedLM(config).save_pretrained(str(directory))
    return str(directory)


@pytest.fixture(scope="session")
def served(checkpoint):
    from mlm_service.model import ServedModel

    return ServedModel(checkpoint)


@pytest.fixture(scope="session")
def client(served):
    from fastapi.testclient import TestClient

    from mlm_service.app import create_app

    return TestClient(create_app(served))
