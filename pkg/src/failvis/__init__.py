"""failvis: annotate, benchmark, and supervise robot manipulation failures.

The toolkit is organized around a small visual-symbol language for corrective
guidance.  Subpackages:

* ``symbols`` — symbol types, the symbol-code text format, validation,
  deterministic rendering, and geometry.
* ``store`` — trajectory ingest, frame sampling, and dataset statistics.
* ``annotation`` — the three-stage failure-annotation workflow.
* ``vqa`` — question/answer pair generation and train/bench splits.
* ``evaluation`` — endpoint clients, closed/open-ended scoring, judge
  aggregation, and report building.
* ``supervisor`` — the live policy-correction loop (masking, target points,
  session state machine).
* ``service`` — the HTTP API used by the annotation front-end.
"""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
