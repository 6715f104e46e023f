# utils/constants.py
# Tool identity
TOOL_NAME = "morphgrad"
TOOL_VERSION = "1.0.0"

# Exit codes
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4
EXIT_VERIFICATION = 5

# CSV schema marker, first line of every CSV the tool writes
CSV_HEADER_COMMENT = "# morphgrad-csv v1"

# Run directory layout
INDEX_FILE = "index.json"
RUN_MANIFEST_FILE = "run_manifest.json"
HISTORY_FILE = "history.csv"
METRICS_CSV_FILE = "metrics.csv"
METRICS_JSON_FILE = "metrics.json"
CHECKPOINT_TEMPLATE = "fold_{fold}.morphnet"
VOLUME_SUFFIX = ".morv"

# CSV columns
HISTORY_COLUMNS = ["fold", "epoch", "train_loss", "val_loss"]
REPORT_REGIONS = ["whole", "core", "enhancing"]
REPORT_METRICS = ["dice", "sensitivity"]
COMPARE_COLUMNS = ["variant"] + [f"{region}_{metric}" for metric in REPORT_METRICS for region in REPORT_REGIONS]

# Filter command choices
FILTER_OPS = ["erode", "dilate", "open", "close"]
FILTER_IMPLS = ["flat", "chm"]

# Gradient check scopes and thresholds
GRADCHECK_SCOPES = ["tensor", "morph", "block", "network"]
GRADCHECK_THRESHOLD = 1e-4
NETWORK_GRADCHECK_THRESHOLD = 1e-3
NETWORK_GRADCHECK_ENTRIES = 50

# Messages
HELP_MESSAGE = """
Differentiable 3D morphology: flat and counter-harmonic-mean operators,
morphological residual blocks and a deep-supervised U-Net, trained with
k-fold cross-validation on synthetic nested-ellipsoid volumes.

Commands:
  gen-data    generate MORV1 volumes from a JSON data spec
  filter      apply one morphological operator to a MORV1 volume
  train       k-fold training of one architecture variant
  evaluate    re-score a finished run from its checkpoints
  compare     collect runs into a region x metric table
  gradcheck   finite-difference verification of every gradient
  bench       time the extremum and convolution kernels

Exit codes: 0 ok, 2 config, 3 I/O, 4 numerical/domain, 5 verification failure.
"""
