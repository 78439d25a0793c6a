#!/usr/bin/env python3
"""Regenerate tests/golden/: one .bin per corpus frame plus manifest.json.

The manifest carries the decoded field values as strings (u64-safe for
JSON-challenged consumers) so non-Python implementations can assert both
directions without re-deriving expectations.
"""

import json
import struct
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "tests"))

from mmpi.wire import PayloadKind, encode_frame
from golden_corpus import GOLDEN_FRAMES


def payload_values_as_strings(payload):
    if payload.kind == PayloadKind.EMPTY:
        return []
    if payload.kind == PayloadKind.BYTES:
        return [bytes(payload.values).hex()]
    if payload.kind == PayloadKind.U64_ARRAY:
        return [str(v) for v in payload.values]
    # F64: the raw bit pattern is the portable identity
    return [struct.pack(">d", v).hex() for v in payload.values]


def main():
    out_dir = REPO / "tests" / "golden"
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for name, frame in GOLDEN_FRAMES:
        data = encode_frame(frame)
        (out_dir / f"{name}.bin").write_bytes(data)
        manifest.append({
            "name": name,
            "msg_type": int(frame.msg_type),
            "source": frame.source,
            "dest": frame.dest,
            "tag": frame.tag,
            "payload_kind": int(frame.payload.kind),
            "payload_values": payload_values_as_strings(frame.payload),
            "encoded_hex": data.hex(),
        })
        print(f"{name}: {len(data)} bytes")
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(manifest)} frames to {out_dir}")


if __name__ == "__main__":
    main()
