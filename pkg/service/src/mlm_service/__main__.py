"""Run the sidecar: ``python -m mlm_service --model <path-or-id> [options]``."""

import argparse

import uvicorn

from mlm_service.app import DEFAULT_MAX_BATCH_ITEMS, create_app
from mlm_service.model import ServedModel


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", required=True,
                        help="checkpoint directory or hub identifier")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--max-batch", type=int, default=DEFAULT_MAX_BATCH_ITEMS)
    args = parser.parse_args()

    served = ServedModel(args.model, device=args.device)
    app = create_app(served, max_batch_items=args.max_batch)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


if __name__ == "__main__":
    main()
