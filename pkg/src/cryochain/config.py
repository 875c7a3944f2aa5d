"""JSON configuration documents mirroring :class:`ChainConfig`.

Every key is optional (missing keys take the dataclass default) but unknown
keys are rejected, with the full dotted path in the error message.
"""

import dataclasses
import json
import types
import typing
from pathlib import Path

from .chain import ChainConfig
from .errors import ConfigError, CryoChainError


def _dataclass_type(hint):
    """The dataclass inside ``hint`` (handles ``X | None``), else None."""
    if dataclasses.is_dataclass(hint):
        return hint
    if isinstance(hint, types.UnionType) or typing.get_origin(hint) is typing.Union:
        for arg in typing.get_args(hint):
            if dataclasses.is_dataclass(arg):
                return arg
    return None


def _is_tuple(hint):
    if hint is tuple or typing.get_origin(hint) is tuple:
        return True
    if isinstance(hint, types.UnionType):
        return any(_is_tuple(a) for a in typing.get_args(hint))
    return False


def from_dict(cls, data, path=""):
    """Build dataclass ``cls`` from nested plain data, validating keys."""
    where = path or "<root>"
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    for key in data:
        if key not in names:
            raise ConfigError(f"unknown key '{path + '.' if path else ''}{key}'")
    kwargs = {}
    for key, value in data.items():
        sub = f"{path}.{key}" if path else key
        hint = hints[key]
        nested = _dataclass_type(hint)
        if nested is not None and value is not None:
            value = from_dict(nested, value, sub)
        elif _is_tuple(hint) and isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except CryoChainError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def to_dict(obj):
    return json.loads(json.dumps(dataclasses.asdict(obj), allow_nan=False))


def load_config(source):
    """Load a ChainConfig from a path, a JSON string or an already-parsed dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = source
        if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config {source}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return from_dict(ChainConfig, data)


def dump_config(cfg, path=None):
    text = json.dumps(to_dict(cfg), indent=2, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
