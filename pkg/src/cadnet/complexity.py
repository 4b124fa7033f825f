"""Per-layer parameter and FLOP accounting.

Conventions: a multiply-add counts as two FLOPs, and the bias addition
counts as one multiply-add per output element. A dense layer with I
inputs and O outputs therefore costs 2*O*(I+1) FLOPs, and a conv layer
with C input channels, K taps, and F filters costs 2*F*(C*K+1) per
output position. Activations, pooling, dropout, and softmax count as
zero. The dense-only subtotal is reported next to the full total
because complexity summaries of this architecture conventionally quote
just the fully connected layers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Model
from .nn.layers import Conv1D, Dense


@dataclass(frozen=True)
class LayerCost:
    name: str
    output_shape: tuple[int, ...]
    params: int
    flops: int


@dataclass(frozen=True)
class ComplexityReport:
    rows: tuple[LayerCost, ...]
    total_params: int
    total_flops: int
    dense_params: int
    dense_flops: int


def layer_costs(model: Model) -> list[LayerCost]:
    """One row per layer, walking shapes from the model input length."""
    shape: tuple[int, ...] = (1, model.config.input_length)
    counts: dict[str, int] = {}
    rows = []
    for layer in model.layers:
        counts[layer.kind] = counts.get(layer.kind, 0) + 1
        name = f"{layer.kind}{counts[layer.kind]}"
        out = layer.out_shape(shape)
        if isinstance(layer, Conv1D):
            params = layer.filters * (layer.in_channels * layer.kernel + 1)
            flops = 2 * layer.filters * (layer.in_channels * layer.kernel + 1) * out[1]
        elif isinstance(layer, Dense):
            params = layer.out_features * (layer.in_features + 1)
            flops = 2 * layer.out_features * (layer.in_features + 1)
        else:
            params = 0
            flops = 0
        rows.append(LayerCost(name, out, params, flops))
        shape = out
    return rows


def count_params(model: Model) -> int:
    return sum(row.params for row in layer_costs(model))


def count_flops(model: Model) -> int:
    return sum(row.flops for row in layer_costs(model))


def complexity_report(model: Model) -> ComplexityReport:
    rows = layer_costs(model)
    dense_rows = [row for row in rows if row.name.startswith("dense")]
    return ComplexityReport(
        rows=tuple(rows),
        total_params=sum(row.params for row in rows),
        total_flops=sum(row.flops for row in rows),
        dense_params=sum(row.params for row in dense_rows),
        dense_flops=sum(row.flops for row in dense_rows),
    )


def _shape_str(shape: tuple[int, ...]) -> str:
    return "x".join(str(d) for d in shape)


def render_report(report: ComplexityReport) -> str:
    """Aligned text table plus totals and the flagged dense subtotal."""
    header = ("layer", "output shape", "params", "flops")
    body = [
        (row.name, _shape_str(row.output_shape), str(row.params), str(row.flops))
        for row in report.rows
    ]
    widths = [max(len(header[i]), *(len(r[i]) for r in body)) for i in range(4)]
    lines = [
        "  ".join(
            cell.ljust(w) if i < 2 else cell.rjust(w)
            for i, (cell, w) in enumerate(zip(row, widths))
        ).rstrip()
        for row in [header, *body]
    ]
    lines.append("")
    lines.append(f"total params: {report.total_params}")
    lines.append(f"total flops (all layers): {report.total_flops}")
    lines.append(
        f"dense-only flops: {report.dense_flops} "
        "(the figure conventionally quoted for this architecture)"
    )
    return "\n".join(lines) + "\n"


def report_csv(report: ComplexityReport) -> str:
    lines = ["layer,output_shape,params,flops"]
    for row in report.rows:
        lines.append(
            f"{row.name},{_shape_str(row.output_shape)},{row.params},{row.flops}"
        )
    lines.append(f"total,,{report.total_params},{report.total_flops}")
    lines.append(f"dense_subtotal,,{report.dense_params},{report.dense_flops}")
    return "\n".join(lines) + "\n"
