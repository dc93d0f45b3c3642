"""Regenerate tokenizer_golden.jsonl from golden_lines.txt.

Expected outputs come from plain regular expressions, not from the
tokenizer under test. Review the diff by eye before committing a change.
"""

import json
import re
import unicodedata
from pathlib import Path

HERE = Path(__file__).parent
SPLIT = re.escape("।॥৽.,;:!?()[]{}\"'-")
TOKEN_RE = re.compile(rf"[{SPLIT}]|[^\s{SPLIT}]+")
TERM = re.escape("।॥?!.")
SENT_RE = re.compile(rf"[^{TERM}]*[{TERM}]+|[^{TERM}]+$")


def main():
    rows = []
    for line in (HERE / "golden_lines.txt").read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        text = unicodedata.normalize("NFC", line)
        sentences = [s.strip() for s in SENT_RE.findall(text) if s.strip()]
        rows.append({"text": line, "tokens": TOKEN_RE.findall(text), "sentences": sentences})
    with open(HERE / "tokenizer_golden.jsonl", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"{len(rows)} rows")


if __name__ == "__main__":
    main()
