"""Human and machine renderings of report documents."""
import json

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

ZERO_DISPLAY = 1e-12


def is_matrix(value) -> bool:
    return isinstance(value, dict) and {'dim', 're'} <= set(value)


def format_matrix(document, indent: str = "    ") -> list[str]:
    """Aligned fixed-point ``re+imi`` columns; magnitudes below ``ZERO_DISPLAY`` print as zero."""
    rows, cols = document['dim']
    re = np.array(document['re'], dtype=np.float64).reshape(rows, cols)
    im = np.array(document.get('im') or np.zeros((rows, cols)), dtype=np.float64).reshape(rows, cols)
    re[np.abs(re) < ZERO_DISPLAY] = 0.0
    im[np.abs(im) < ZERO_DISPLAY] = 0.0
    cells = [[f"{re[r, c] + 0.0:+.6f}{im[r, c] + 0.0:+.6f}i" for c in range(cols)] for r in range(rows)]
    width = max(len(cell) for row in cells for cell in row)
    return [indent + "  ".join(cell.rjust(width) for cell in row) for row in cells]


def _scalar(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return "-"
    return str(value)


def format_human(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if key == 'schema':
            continue
        if is_matrix(value):
            lines.append(f"{key}: {value['dim'][0]}x{value['dim'][1]}")
            lines.extend(format_matrix(value))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            for item in value:
                lines.append("  - " + ", ".join(f"{k}={_scalar(v)}" for k, v in item.items() if v != ""))
        elif isinstance(value, list):
            lines.append(f"{key}: " + ", ".join(_scalar(v) for v in value))
        else:
            lines.append(f"{key}: {_scalar(value)}")
    return "\n".join(lines)


def format_machine(report: dict) -> str:
    return json.dumps(report, cls=DjangoJSONEncoder, sort_keys=True, indent=2)


def render(report: dict, fmt: str) -> str:
    return format_machine(report) if fmt == 'machine' else format_human(report)
