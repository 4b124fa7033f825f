"""1-D CNN engine for binary single-lead waveform classification.

The public surface: signal records and segment datasets with CSV
round-tripping, a synthetic waveform generator, the network itself with
training and checkpointing, metrics, complexity accounting, a gradient
checker, and the sweep/ablation experiment harnesses. The ``cadnet``
console script (also ``python -m cadnet``) exposes the same steps as
subcommands.
"""

from .complexity import complexity_report, count_flops, count_params
from .errors import (
    ArgumentError,
    CadnetError,
    CorruptionError,
    DataError,
    DegenerateSignalError,
    DivergenceError,
    EmptyDatasetError,
    FormatError,
    NumericError,
    OutOfRangeError,
    ParseError,
    SchemaError,
    ShapeError,
    StateError,
)
from .experiments import (
    ABLATION_CONFIGS,
    AblationSpec,
    DataSpec,
    SweepSpec,
    ablation_csv,
    run_dropout_ablation,
    run_length_sweep,
    sweep_csv,
)
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    confusion,
    derive_metrics,
    metrics_csv,
    metrics_kv,
    render_confusion,
)
from .model import (
    Model,
    ModelConfig,
    build_model,
    clone_config,
    load_checkpoint,
    save_checkpoint,
)
from .nn import (
    available_backends,
    active_backend,
    grad_check,
    set_backend,
    set_checked,
)
from .records import (
    Segment,
    SegmentDataset,
    SignalRecord,
    extract_window,
    load_records,
    load_segments,
    normalize_dataset,
    normalize_record,
    normalize_segment,
    prepare,
    resegment,
    save_records,
    save_segments,
    split,
)
from .synth import (
    BeatParams,
    default_params,
    load_beat_config,
    synth_beat,
    synth_dataset,
    synth_record,
)
from .train import TrainReport, evaluate, history_csv, train

__version__ = "0.1.0"
