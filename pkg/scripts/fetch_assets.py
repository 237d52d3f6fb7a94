"""Fetch and hash-pin the published reference tokenizers.

Downloads the tokenizer files used by the pinned-asset evaluation tests
into assets/ and writes assets/manifest.json mapping each model name to its
file path and sha256. Pinning is trust-on-first-use: a hash recorded in an
existing manifest is verified against any re-download and never silently
replaced. Requires network access to the model hub; the test suite itself
never fetches.

Run:  python scripts/fetch_assets.py [--only NAME]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import urllib.request
from pathlib import Path

ASSETS_DIR = Path(__file__).parent.parent / "assets"
MANIFEST = ASSETS_DIR / "manifest.json"

SOURCES: dict[str, str] = {
    "kl3m-004-128k-cased": "https://huggingface.co/alea-institute/kl3m-004-128k-cased/resolve/main/tokenizer.json",
    "kl3m-004-128k-uncased": "https://huggingface.co/alea-institute/kl3m-004-128k-uncased/resolve/main/tokenizer.json",
    "kl3m-004-char-4k-cased": "https://huggingface.co/alea-institute/kl3m-004-char-4k-cased/resolve/main/tokenizer.json",
    "kl3m-004-char-8k-cased": "https://huggingface.co/alea-institute/kl3m-004-char-8k-cased/resolve/main/tokenizer.json",
    "kl3m-004-char-16k-cased": "https://huggingface.co/alea-institute/kl3m-004-char-16k-cased/resolve/main/tokenizer.json",
    "gpt2": "https://huggingface.co/gpt2/resolve/main/tokenizer.json",
}


def fetch(url: str) -> bytes:
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read()


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--only", action="append", help="fetch just these model names")
    args = parser.parse_args()
    names = args.only or list(SOURCES)

    ASSETS_DIR.mkdir(exist_ok=True)
    manifest = {"models": {}}
    if MANIFEST.exists():
        manifest = json.loads(MANIFEST.read_text(encoding="utf-8"))
        manifest.setdefault("models", {})

    failures = 0
    for name in names:
        url = SOURCES.get(name)
        if url is None:
            print(f"unknown model name: {name}", file=sys.stderr)
            failures += 1
            continue
        try:
            data = fetch(url)
        except OSError as exc:
            print(f"{name}: fetch failed: {exc}", file=sys.stderr)
            failures += 1
            continue
        digest = hashlib.sha256(data).hexdigest()
        pinned = manifest["models"].get(name, {}).get("sha256")
        if pinned is not None and pinned != digest:
            print(
                f"{name}: downloaded hash {digest} does not match the pinned {pinned}; "
                "refusing to overwrite the pin",
                file=sys.stderr,
            )
            failures += 1
            continue
        target = ASSETS_DIR / f"{name}.json"
        target.write_bytes(data)
        manifest["models"][name] = {"path": target.name, "sha256": digest}
        print(f"{name}: {len(data)} bytes, sha256 {digest[:16]}...")

    MANIFEST.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"manifest written: {MANIFEST}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
