import json
from typing import Any, Dict, Optional

from selfsim.config import RunConfig
from selfsim.error_handler import ConfigurationError

REQUIRED_SECTIONS = ('limits', 'suite')
LIMIT_KEYS = ('closure_cap', 'table_limit', 'hom_budget', 'large_group_hom_budget',
              'full_search_order', 'depth_cap', 'property_samples')

__all__ = ['ConfigManager', 'ConfigurationError']


class ConfigManager:
    def __init__(self, config_path):
        self.config_path = config_path
        self.current_config = self.load_config()

    def load_config(self) -> Dict[str, Any]:
        # Load the config from a JSON file
        try:
            with open(self.config_path, 'r') as config_file:
                return json.load(config_file)
        except FileNotFoundError:
            raise ConfigurationError('Configuration file not found.', path=self.config_path)
        except json.JSONDecodeError:
            raise ConfigurationError('Error decoding configuration file.', path=self.config_path)

    def get_section(self, name: str) -> Dict[str, Any]:
        return self.current_config.get(name, {})

    def update_config(self, new_config: Dict[str, Any]):
        # Merge section by section so a partial update keeps the other keys
        for key, value in new_config.items():
            if isinstance(value, dict) and isinstance(self.current_config.get(key), dict):
                self.current_config[key].update(value)
            else:
                self.current_config[key] = value
        self.validate_config()

    def validate_config(self):
        for section in REQUIRED_SECTIONS:
            if section not in self.current_config:
                raise ConfigurationError(f'{section} configuration is missing.')
        for key, value in self.current_config['limits'].items():
            if key not in LIMIT_KEYS:
                raise ConfigurationError(f'unknown limit {key!r}.')
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigurationError(f'limit {key!r} must be a positive integer.', value=value)
        groups = self.current_config['suite'].get('groups', [])
        if not isinstance(groups, list) or not all(isinstance(g, str) for g in groups):
            raise ConfigurationError('suite groups must be a list of catalog names.')

    def to_run_config(self, base: Optional[RunConfig] = None) -> RunConfig:
        # File values override the base (usually RunConfig.from_env())
        self.validate_config()
        base = base or RunConfig()
        output = self.get_section('output')
        suite = self.get_section('suite')
        try:
            return base.with_overrides(
                **self.current_config['limits'],
                skip_search_on_obstruction=suite.get('skip_search_on_obstruction'),
                output_format=output.get('format'),
                log_level=self.get_section('logging').get('level'),
                log_file=self.get_section('logging').get('file'),
            )
        except ValueError as e:
            raise ConfigurationError(f'Invalid configuration: {e}')

    def save_config(self):
        # Save the current configuration back to the file
        try:
            with open(self.config_path, 'w') as config_file:
                json.dump(self.current_config, config_file, indent=4, sort_keys=True)
        except IOError as e:
            raise ConfigurationError(f'Error saving configuration: {e}')
