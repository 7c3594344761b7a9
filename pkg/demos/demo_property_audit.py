"""Audit every structural identity for one configuration.

The same report is available from the command line:

    halfline verify --config cfg.json

Run:  python demos/demo_property_audit.py
"""

import json

import numpy as np

from halfline.config import parse_config
from halfline.verify import run_property_checks

cfg = parse_config(json.dumps({
    "bc": {"n": 2,
           "A": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]],
           "B": [[[-1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]},
    "potential": {"n": 2, "pieces": [
        {"x_lo": 0.0, "x_hi": 1.0,
         "V": [[[-0.9, 0.0], [0.25, -0.1]], [[0.25, 0.1], [0.4, 0.0]]]},
    ]},
}))

checks = run_property_checks(cfg)
width = max(len(c["name"]) for c in checks)
for c in checks:
    status = "ok " if c["pass"] else "FAIL"
    print(f"{c['name']:<{width}}  {c['residual']:11.3e}  (tol {c['tol']:.0e})  {status}")
print("\nall pass:", all(c["pass"] for c in checks))
