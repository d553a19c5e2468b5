"""
Classes and helper methods to declare, load and override run configurations.

Configurations are `ml_collections.ConfigDict` objects. Defaults are declared
as annotated classes (see `as_config_dict`), presets are loaded from YAML
(see `read_yaml`) and user parameters come from plain ``key = value``
text files (see `parse_kv_text`).
"""
import ast
import inspect
import logging
import math
import operator
import typing
from pathlib import Path
from typing import Any, Dict, Union

import yaml
from ml_collections import config_dict

from nonstatic_phase.exceptions import ConfigError

logger = logging.getLogger(__name__)


def read_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load a YAML mapping (an empty file gives an empty dict).
    """
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level, got {type(data).__name__}")
    return data


def as_config_dict(clss=None, *, frozen=False):
    """
    Decorator to convert an annotated class to a `ml_collections.ConfigDict`.
    Annotated fields without a default become typed placeholders.

    See: https://ml-collections.readthedocs.io/en/latest/config_dict.html
    """
    if clss is None:
        return lambda clss: as_config_dict(clss, frozen=frozen)
    elif not isinstance(clss, type):
        raise ValueError("clss argument must be a class")
    cls_fields = get_class_fields(clss)
    for name, annotation in typing.get_type_hints(clss).items():
        if name in cls_fields:
            continue
        cls_fields[name] = config_dict.placeholder(annotation)
    if frozen:
        return config_dict.FrozenConfigDict(cls_fields)
    return config_dict.ConfigDict(cls_fields)


def get_class_fields(clss) -> Dict[str, Any]:
    hints = typing.get_type_hints(clss)
    return {
        k: getattr(clss, k)
        for k in dir(clss)
        if not k.startswith("_")
        and not inspect.ismethod(getattr(clss, k))
        and ((not callable(getattr(clss, k))) or (k in hints))
    }


def set_conf_param(conf: config_dict.ConfigDict, param: str, value: Any) -> None:
    """
    Set a (possibly dotted) parameter of a config.
    """
    node = conf
    keys = param.split(".")
    for key in keys[:-1]:
        node = node[key]
    node[keys[-1]] = value


_BINARY_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY_OPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY_OPS:
        return _BINARY_OPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY_OPS:
        return _UNARY_OPS[type(node.op)](_eval_node(node.operand))
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError(f"unsupported expression element: {ast.dump(node)}")


def parse_value(text: str) -> Any:
    """
    Parse a configuration value: a Python literal, or an arithmetic expression
    over numbers, ``pi``, ``e`` and ``sqrt(...)`` (e.g. ``pi/8``).
    """
    text = text.strip()
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        pass
    try:
        return _eval_node(ast.parse(text, mode="eval"))
    except (ValueError, SyntaxError, ZeroDivisionError) as e:
        lowered = text.lower()
        if lowered in ("true", "false"):
            return lowered == "true"
        raise ValueError(f"cannot parse value {text!r}: {e}") from e


def parse_kv_text(text: str, source: str = "<string>") -> Dict[str, Any]:
    """
    Parse ``key = value`` lines. ``#`` starts a comment, blank lines are
    ignored. Raises `ConfigError` naming the offending line.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: empty key or value in {raw.strip()!r}")
        if key in values:
            logger.warning(f"{source}:{lineno}: duplicate key {key!r}, last value wins")
        try:
            values[key] = parse_value(value)
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: {e}") from e
    return values


def read_kv_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    return parse_kv_text(text, source=str(path))
