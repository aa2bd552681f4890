"""Machine-readable command output.

Reals are written with 17 significant digits so every double round-trips.
Non-finite reals are written as the strings "inf", "-inf" and "nan".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

SCHEMA_VERSION = 1


def format_real(x: float) -> str:
    return format(float(x), ".17g")


def _json_value(v: Any) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_real(v) if math.isfinite(v) else json.dumps(format_real(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if hasattr(v, "item"):  # numpy scalar
        return _json_value(v.item())
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _csv_value(v: Any) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float):
        return format_real(v)
    text = str(v)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


@dataclass
class OutputRecord:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        body = {
            "schema_version": self.schema_version,
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        return _json_value(body) + "\n"

    def to_csv(self) -> str:
        lines = ["field,value", f"schema_version,{self.schema_version}", f"command,{self.command}"]
        lines += [f"inputs.{k},{_csv_value(v)}" for k, v in self.inputs.items()]
        lines += [f"outputs.{k},{_csv_value(v)}" for k, v in self.outputs.items()]
        return "\n".join(lines) + "\n"

    def render(self, fmt: str = "json") -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()


def load_schema() -> dict:
    text = resources.files("statsum").joinpath("schema/output_record.schema.json").read_text()
    return json.loads(text)
