"""CSV tables and run manifests."""
import csv
import json
import os
import platform
import time

import numpy
import scipy

from . import __version__


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in r])
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def versions():
    return {"python": platform.python_version(), "numpy": numpy.__version__,
            "scipy": scipy.__version__, "stable_clt_lab": __version__}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (numpy.floating, numpy.integer, numpy.bool_)):
        return obj.item()
    if isinstance(obj, float) and not numpy.isfinite(obj):
        return str(obj)
    return obj


def write_manifest(out_dir, config, summary, outputs, started):
    """``manifest.json`` beside the outputs: resolved config, versions, runtime, summary."""
    os.makedirs(out_dir, exist_ok=True)
    doc = {"config": config.sections, "config_text": config.dumps(), "versions": versions(),
           "runtime_seconds": time.perf_counter() - started, "outputs": sorted(outputs),
           "summary": _plain(summary)}
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
