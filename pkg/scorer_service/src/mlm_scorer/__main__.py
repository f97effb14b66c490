"""Run the scoring service: `python -m mlm_scorer` or `mlm-scorer`.

Environment:
  MLM_MODEL_ID    hugging-face model id or "random-tiny" (default bert-large-uncased)
  MLM_BIND        host:port to bind (default 0.0.0.0:8601)
  MLM_BATCH_SIZE  candidates scored per forward pass (default 16)
"""

import os

import uvicorn

from .app import create_app


def main():
    host, _, port = os.environ.get("MLM_BIND", "0.0.0.0:8601").rpartition(":")
    uvicorn.run(create_app(), host=host or "0.0.0.0", port=int(port))


if __name__ == "__main__":
    main()
