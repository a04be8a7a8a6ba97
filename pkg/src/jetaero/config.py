# config.py
"""
Process-wide settings for jetaero.

Values come from three layers, later ones winning:
defaults, then a JSON file (``config.json`` next to ``src/`` or
``JETAERO_CONFIG_FILE``), then ``JETAERO_*`` environment variables.
Per-run settings (gains, scenarios, oracle grids) live in their own files.
"""
import os
import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple


class ConfigurationError(Exception):
    """Settings could not be loaded or failed validation."""
    pass


LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
MAX_PLANT_DT = 5e-3


class Config:
    """Resolved settings. Attribute names are upper case, as in the JSON keys upper-cased."""

    # attribute -> (json key, environment variable, converter)
    SETTINGS: Dict[str, Tuple[str, str, Callable[[Any], Any]]] = {
        'LOG_FILE': ('log_file', 'JETAERO_LOG_FILE', Path),
        'LOG_LEVEL': ('log_level', 'JETAERO_LOG_LEVEL', str),
        'OUTPUT_DIR': ('output_dir', 'JETAERO_OUTPUT_DIR', Path),
        'AIR_DENSITY': ('air_density', 'JETAERO_AIR_DENSITY', float),
        'GRAVITY': ('gravity', 'JETAERO_GRAVITY', float),
        'PLANT_DT': ('plant_dt', 'JETAERO_PLANT_DT', float),
        'CONTROL_DT': ('control_dt', 'JETAERO_CONTROL_DT', float),
    }

    def __init__(self):
        # repository root: src/jetaero/config.py -> ../../..
        self.PROJECT_ROOT = Path(__file__).parent.parent.parent

        self._set_defaults()
        self._apply_file(self._config_file())
        self._apply_environment()

        self.LOG_FILE = str(self.LOG_FILE)
        self.OUTPUT_DIR = str(self.OUTPUT_DIR)

    def _set_defaults(self):
        self.LOG_FILE = self.PROJECT_ROOT / 'jetaero.log'
        self.LOG_LEVEL = 'INFO'
        self.OUTPUT_DIR = self.PROJECT_ROOT / 'runs'

        # kg/m^3 and m/s^2
        self.AIR_DENSITY = 1.225
        self.GRAVITY = 9.81

        self.PLANT_DT = 1e-3
        self.CONTROL_DT = 1e-2

        # Lasso coordinate descent and the cross-validated penalty search
        self.NUMERICS = {
            'lasso_tol': 1e-10,
            'lasso_max_sweeps': 100000,
            'cv_folds': 5,
            'cv_grid': 20,
        }

    def _config_file(self) -> Optional[Path]:
        explicit = os.getenv('JETAERO_CONFIG_FILE')
        if explicit:
            return Path(explicit)
        candidate = self.PROJECT_ROOT / 'config.json'
        return candidate if candidate.exists() else None

    def _apply_file(self, path: Optional[Path]):
        if path is None or not path.exists():
            return
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Invalid JSON in config file '{path}': {e}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config file '{path}' must hold a JSON object")

        try:
            for attribute, (key, _, convert) in self.SETTINGS.items():
                if key in data:
                    setattr(self, attribute, convert(data[key]))
            if 'numerics' in data:
                self.NUMERICS.update(data['numerics'])
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid value in config file '{path}': {e}")

    def _apply_environment(self):
        for attribute, (_, env_name, convert) in self.SETTINGS.items():
            raw = os.getenv(env_name)
            if not raw:
                continue
            try:
                setattr(self, attribute, convert(raw))
            except ValueError as e:
                raise ConfigurationError(f"Invalid value for {env_name}='{raw}': {e}")

    def validate(self) -> Tuple[bool, List[str], List[str]]:
        """
        Check the resolved settings.

        Creates the log directory when it is missing.

        Returns:
            (is_valid, errors, warnings)
        """
        errors: List[str] = []
        warnings: List[str] = []

        log_dir = Path(self.LOG_FILE).parent
        if log_dir.exists():
            if not os.access(log_dir, os.W_OK):
                errors.append(f"Log directory '{log_dir}' is not writable")
        else:
            try:
                log_dir.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                errors.append(f"Cannot create log directory '{log_dir}': {e}")

        if self.LOG_LEVEL.upper() not in LOG_LEVELS:
            errors.append(f"Unknown log level '{self.LOG_LEVEL}'")

        if not Path(self.OUTPUT_DIR).exists():
            warnings.append(f"Output directory '{self.OUTPUT_DIR}' does not exist. It will be created on first write.")

        if self.AIR_DENSITY <= 0:
            errors.append(f"Air density must be positive, got {self.AIR_DENSITY}")

        if self.GRAVITY <= 0:
            errors.append(f"Gravity must be positive, got {self.GRAVITY}")

        if self.PLANT_DT <= 0 or self.CONTROL_DT <= 0:
            errors.append("Plant and control time steps must be positive")
        elif self.PLANT_DT > MAX_PLANT_DT:
            errors.append(f"Plant time step {self.PLANT_DT} s exceeds the 5 ms stability guard")
        elif self.CONTROL_DT < self.PLANT_DT:
            errors.append("Control time step must not be shorter than the plant time step")
        else:
            ratio = self.CONTROL_DT / self.PLANT_DT
            if abs(ratio - round(ratio)) > 1e-9:
                warnings.append(f"Control dt {self.CONTROL_DT} is not a multiple of plant dt {self.PLANT_DT}; it will be rounded")

        if int(self.NUMERICS.get('cv_folds', 0)) < 2:
            errors.append("Cross-validation needs at least 2 folds")

        return not errors, errors, warnings

    def get_summary(self) -> Dict[str, Any]:
        summary = {key: getattr(self, attribute) for attribute, (key, _, _) in self.SETTINGS.items()}
        summary['numerics'] = self.NUMERICS.copy()
        return summary


_config_instance: Optional[Config] = None


def get_config() -> Config:
    """Shared Config, built on first use."""
    global _config_instance
    if _config_instance is None:
        _config_instance = Config()
    return _config_instance


def validate_config() -> None:
    """
    Log warnings and raise on errors from Config.validate().

    Raises:
        ConfigurationError: listing every failed check
    """
    is_valid, errors, warnings = get_config().validate()

    if warnings:
        from jetaero.utils.logger import get_logger
        log = get_logger(__name__)
        for warning in warnings:
            log.warning(f"Configuration warning: {warning}")

    if not is_valid:
        raise ConfigurationError("Configuration validation failed:\n" + "\n".join(f"  - {e}" for e in errors))


_config = get_config()

# Module-level shortcuts
LOG_FILE = _config.LOG_FILE
LOG_LEVEL = _config.LOG_LEVEL
OUTPUT_DIR = _config.OUTPUT_DIR
AIR_DENSITY = _config.AIR_DENSITY
GRAVITY = _config.GRAVITY
PLANT_DT = _config.PLANT_DT
CONTROL_DT = _config.CONTROL_DT
NUMERICS = _config.NUMERICS
