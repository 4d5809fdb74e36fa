import logging
from dataclasses import dataclass, field, fields
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)


@dataclass
class InterpreterConfig:
    tolerance: float = 1e-9
    dense_qubit_limit: int = 16
    extract_max_qubits: int = 12
    workers: int = 4


@dataclass
class CompilerConfig:
    perm_mode: str = "compact"
    strategy: str = "merge"


@dataclass
class OutputConfig:
    amplitude_threshold: float = 1e-12
    precision: int = 12


@dataclass
class BenchConfig:
    workers: int = 4
    seed: Optional[int] = None
    verify_max_qubits: int = 10
    verify_random_states: int = 5


@dataclass
class PlpConfig:
    log_level: str = "INFO"
    interpreter: InterpreterConfig = field(default_factory=InterpreterConfig)
    compiler: CompilerConfig = field(default_factory=CompilerConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    bench: BenchConfig = field(default_factory=BenchConfig)


plp_config = PlpConfig()


def _coerce(value: Any, default: Any) -> Any:
    """Environment placeholders arrive as strings; bring them to the default's type."""
    if value is None or not isinstance(value, str):
        return value
    if isinstance(default, bool):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(default, int) or default is None and value.strip().lstrip("-").isdigit():
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def _build_section(section_type, data: Dict[str, Any]):
    defaults = section_type()
    known = {f.name for f in fields(section_type)}
    kwargs = {}
    for key, value in (data or {}).items():
        if key not in known:
            logger.warning(f"Ignoring unknown config key '{section_type.__name__}.{key}'.")
            continue
        if value is None:
            continue
        kwargs[key] = _coerce(value, getattr(defaults, key))
    return section_type(**kwargs)


def update_config(new_config: Dict[str, Any]):
    """Updates the global plp_config with a dictionary."""
    global plp_config
    plp_config.log_level = new_config.get("log_level") or "INFO"
    plp_config.interpreter = _build_section(InterpreterConfig, new_config.get("interpreter", {}))
    plp_config.compiler = _build_section(CompilerConfig, new_config.get("compiler", {}))
    plp_config.output = _build_section(OutputConfig, new_config.get("output", {}))
    plp_config.bench = _build_section(BenchConfig, new_config.get("bench", {}))
