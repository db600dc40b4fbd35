"""
Configuration system for the commentator.
Values come from defaults, the environment / .env, an optional TOML file and
command-line overrides, in increasing order of precedence.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from dotenv import load_dotenv
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from commentator.commentary_text import (
    EventThresholds,
    PlayerNames,
    load_default_templates,
    load_template_file,
)
from commentator.errors import ConfigurationError
from commentator.game_model import RoundConfig
from commentator.highlight_engine import CueWeights, RankActTable
from commentator.phonetic_adjuster import DesignId, PhoneticRange
from commentator.scheduler_pipeline import EngineConfig
from commentator.tts_client import AudioEncoding, VoiceConfig

# Load environment variables from .env file
load_dotenv(".env")


class CommentaryConfig(BaseSettings):
    """Main commentator configuration."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Round rules
    initial_hp: int = Field(default=200, gt=0)
    round_duration_s: float = Field(default=60.0, gt=0)
    fps: float = Field(default=60.0, gt=0)
    stage_width: float = Field(default=960.0, gt=0)

    # Cue weights
    weight_score: float = Field(default=1.0 / 3.0)
    weight_action: float = Field(default=1.0 / 3.0)
    weight_distance: float = Field(default=1.0 / 3.0)

    # Phonetic ranges
    design: int = Field(default=1, ge=1, le=5, description="Experimental design 1..5")
    pitch_min: float = Field(default=-6.0)
    pitch_max: float = Field(default=14.0)
    pitch_default: float = Field(default=0.0)
    volume_map_min: float = Field(default=-4.0)
    volume_map_max: float = Field(default=4.0)
    volume_clamp_min: float = Field(default=-6.0)
    volume_clamp_max: float = Field(default=6.0)
    volume_default: float = Field(default=0.0)

    # Commentary text
    templates_path: Optional[Path] = Field(default=None)
    p1_name: str = Field(default="Garnet")
    p2_name: str = Field(default="Zen")
    big_hp_drop: int = Field(default=30, gt=0)
    round_near_end: float = Field(default=0.8)
    close_quarters: float = Field(default=0.9)
    neutral_cadence_s: float = Field(default=6.0, ge=0)
    seed: int = Field(default=0, ge=0)

    # Text-to-speech
    tts_endpoint: str = Field(default="https://texttospeech.googleapis.com/v1/text:synthesize")
    tts_auth_token: Optional[str] = Field(default=None)
    tts_timeout_s: float = Field(default=5.0, gt=0)
    language_code: str = Field(default="en-US")
    voice_name: str = Field(default="en-US-Wavenet-D")
    audio_encoding: Literal["MP3", "LINEAR16"] = Field(default="MP3")

    def get_round_config(self) -> RoundConfig:
        return RoundConfig(
            initial_hp=self.initial_hp,
            round_duration_s=self.round_duration_s,
            fps=self.fps,
            stage_width=self.stage_width,
        )

    def get_weights(self) -> CueWeights:
        return CueWeights(
            w_s=self.weight_score, w_a=self.weight_action, w_d=self.weight_distance
        )

    def get_pitch_range(self) -> PhoneticRange:
        return PhoneticRange(min=self.pitch_min, max=self.pitch_max, default=self.pitch_default)

    def get_volume_map_range(self) -> PhoneticRange:
        return PhoneticRange(
            min=self.volume_map_min, max=self.volume_map_max, default=self.volume_default
        )

    def get_volume_clamp_range(self) -> PhoneticRange:
        return PhoneticRange(
            min=self.volume_clamp_min, max=self.volume_clamp_max, default=self.volume_default
        )

    def get_thresholds(self) -> EventThresholds:
        return EventThresholds(
            big_hp_drop=self.big_hp_drop,
            round_near_end=self.round_near_end,
            close_quarters=self.close_quarters,
        )

    def get_voice_config(self) -> VoiceConfig:
        return VoiceConfig(
            language_code=self.language_code,
            voice_name=self.voice_name,
            audio_encoding=AudioEncoding(self.audio_encoding),
        )

    def create_engine(self) -> EngineConfig:
        """
        Build the engine bundle for a commentary run.

        Raises:
            ConfigurationError: any sub-configuration is inconsistent
        """
        try:
            templates = (
                load_template_file(self.templates_path)
                if self.templates_path is not None
                else load_default_templates()
            )
            return EngineConfig(
                round=self.get_round_config(),
                rank_table=RankActTable.default(),
                weights=self.get_weights(),
                design=DesignId(self.design),
                pitch_range=self.get_pitch_range(),
                volume_map_range=self.get_volume_map_range(),
                volume_clamp_range=self.get_volume_clamp_range(),
                thresholds=self.get_thresholds(),
                names=PlayerNames(p1=self.p1_name, p2=self.p2_name),
                templates=tuple(templates),
                neutral_cadence_s=self.neutral_cadence_s,
                seed=self.seed,
            )
        except ValidationError as e:
            raise ConfigurationError(str(e)) from e
        except OSError as e:
            raise ConfigurationError(f"cannot read templates: {e}") from e


def _flatten(table: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat = {}
    for key, value in table.items():
        name = f"{prefix}_{key}" if prefix else key
        if isinstance(value, dict):
            flat.update(_flatten(value, name))
        else:
            flat[name.replace(".", "_").replace("-", "_")] = value
    return flat


def load_config(path: Optional[Path] = None, **overrides: Any) -> CommentaryConfig:
    """
    Create a configuration from an optional TOML file plus overrides.

    Nested tables flatten into field names: [volume] map_min = -4 -> volume_map_min.
    Overrides whose value is None are ignored.

    Raises:
        ConfigurationError: unreadable file or invalid values
    """
    values: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as f:
                values.update(_flatten(tomllib.load(f)))
        except (OSError, tomllib.TOMLDecodeError) as e:
            raise ConfigurationError(f"cannot load config {path}: {e}") from e
    values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return CommentaryConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(str(e)) from e


# Global configuration instance
_config: Optional[CommentaryConfig] = None


def get_config() -> CommentaryConfig:
    """Get or create the global configuration instance."""
    global _config
    if _config is None:
        _config = CommentaryConfig()
    return _config
