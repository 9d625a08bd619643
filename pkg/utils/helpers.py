"""Report and table formatting helpers"""
import io
import json
import math
import sys
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from utils.errors import ValidationError

# keys whose values are complex numbers encoded as [re, im]
COMPLEX_KEYS = {'gamma', 'beta', 'rho', 'gamma_param', 'beta_limit', 'rho_limit', 'value',
                'monic_defect', 't', 'coeff'}
# keys holding lists of such pairs
COMPLEX_LIST_KEYS = {'roots'}


def encode_complex(z) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(pair) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ValidationError(f"expected a [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types; complex values become [re, im]"""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    return obj


def build_report(command: str, operator: str, payload: Dict[str, Any], config_echo: Dict[str, Any],
                 schema: str) -> Dict[str, Any]:
    return to_jsonable({
        'schema': schema,
        'command': command,
        'operator': operator,
        **payload,
        'numerics': config_echo,
    })


def render_report(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False)


def _decode(obj: Any, key: Optional[str] = None) -> Any:
    if isinstance(obj, dict):
        return {k: _decode(v, k) for k, v in obj.items()}
    if key in COMPLEX_KEYS and isinstance(obj, list) and len(obj) == 2 \
            and all(isinstance(v, (int, float)) for v in obj):
        return decode_complex(obj)
    if key in COMPLEX_LIST_KEYS and isinstance(obj, list):
        return [decode_complex(v) for v in obj]
    if isinstance(obj, list):
        return [_decode(v, key) for v in obj]
    if isinstance(obj, str) and obj in ('nan', 'inf', '-inf'):
        return float(obj)
    return obj


def parse_report(text: str, schema: str = 'hsolv_report_v1') -> Dict[str, Any]:
    """Inverse of render_report with complex pairs decoded"""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"report is not valid JSON: {e}") from e
    if not isinstance(raw, dict) or raw.get('schema') != schema:
        raise ValidationError(f"report schema is not {schema!r}")
    return _decode(raw)


def _is_complex_cell(value) -> bool:
    if isinstance(value, (complex, np.complexfloating)):
        return True
    return isinstance(value, (list, tuple)) and len(value) == 2 \
        and all(isinstance(v, (int, float)) for v in value)


def _as_complex(value) -> complex:
    if value is None:
        return complex('nan')
    if isinstance(value, (list, tuple)):
        return decode_complex(value)
    return complex(value)


def split_complex_columns(df: pd.DataFrame) -> pd.DataFrame:
    """Replace each complex column c (complex values or [re, im] pairs) by c_re, c_im"""
    out = pd.DataFrame(index=df.index)
    for column in df.columns:
        values = df[column]
        if values.map(_is_complex_cell).any():
            as_complex = values.map(_as_complex)
            out[f'{column}_re'] = as_complex.map(lambda z: z.real)
            out[f'{column}_im'] = as_complex.map(lambda z: z.imag)
        else:
            out[column] = values
    return out


def render_table(df: pd.DataFrame, summary: Optional[Dict[str, Any]] = None) -> str:
    """Comma-separated table with a header row; summary as trailing '# key=value' lines"""
    buffer = io.StringIO()
    split_complex_columns(df).to_csv(buffer, index=False)
    for key, value in (summary or {}).items():
        if isinstance(value, bool):
            value = str(value).lower()
        buffer.write(f"# {key}={value}\n")
    return buffer.getvalue()


def format_check_lines(results: Dict[str, Dict[str, Any]]) -> str:
    """One line per check: name, PASS/FAIL, margin"""
    lines = []
    for name, record in results.items():
        mark = "✅ PASS" if record['passed'] else "❌ FAIL"
        lines.append(f"{mark} {name} margin={record['margin']:.3e}")
    return "\n".join(lines)


def write_output(text: str, path: Optional[str] = None):
    if path:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text if text.endswith('\n') else text + '\n')
    else:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')
