"""Report envelopes and atomic JSON/CSV emission.

Every emitted file carries an envelope (tool version, echoed config,
timestamp); the payload alone is the deterministic part and re-running
with the echoed config must reproduce it byte for byte.  Files are
written to a temp path in the target directory and renamed into place.
"""

import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone

from . import __version__


def envelope(config, payload):
    return {
        "tool_version": __version__,
        "config": config,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "payload": payload,
    }


def payload_bytes(payload):
    """Canonical byte encoding of a payload, used for determinism checks."""
    return json.dumps(payload, indent=2).encode()


def _atomic_write(path, data: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2).encode() + b"\n")


def write_csv(path, header, rows, config=None):
    """CSV with the envelope as leading '#' comment lines."""
    buf = io.StringIO()
    buf.write(f"# tool_version: {__version__}\n")
    if config is not None:
        buf.write(f"# config: {json.dumps(config)}\n")
    buf.write(f"# timestamp: {datetime.now(timezone.utc).isoformat()}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue().encode())


def scan_csv_rows(report):
    """Histogram CSV body plus footer rows with the summary statistics."""
    h = report.histogram
    edges = h.bin_edges()
    rows = [
        [repr(float(edges[i])), repr(float(edges[i + 1])), int(h.counts[i])]
        for i in range(h.bin_count)
    ]
    state = h.min_state
    state_json = json.dumps(
        None if state is None else {
            "re": [float(z.real) for z in state],
            "im": [float(z.imag) for z in state],
        }
    )
    rows += [
        ["min_seen", repr(float(h.min_seen)), ""],
        ["max_seen", repr(float(h.max_seen)), ""],
        ["mean", repr(float(h.mean)), ""],
        ["samples", str(report.samples), ""],
        ["min_state", state_json, ""],
    ]
    return ["bin_lo", "bin_hi", "count"], rows


def read_scan_csv(path):
    """Parse a scan CSV back into (bins, footer) for round-trip checks."""
    bins = []
    footer = {}
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
        reader = csv.reader(lines)
        header = next(reader)
        for row in reader:
            if row[0] in ("min_seen", "max_seen", "mean", "samples", "min_state"):
                footer[row[0]] = row[1]
            else:
                bins.append((float(row[0]), float(row[1]), int(row[2])))
    return header, bins, footer
