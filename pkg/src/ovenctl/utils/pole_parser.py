"""Validation and parsing of command-line pole and state lists."""
import math
from typing import Optional, Union


class PoleParser:
    """Parses comma-separated numeric arguments."""

    EXPECTED_COUNT = 3
    OBSERVER_INIT_KEYWORDS = ("plant", "ambient")

    @staticmethod
    def _split(text: str) -> list[float]:
        parts = [p.strip() for p in text.split(",")]
        if any(not p for p in parts):
            raise ValueError(f"empty entry in '{text}'")
        values = []
        for part in parts:
            try:
                value = float(part)
            except ValueError:
                raise ValueError(f"'{part}' is not a real number") from None
            if not math.isfinite(value):
                raise ValueError(f"'{part}' is not finite")
            values.append(value)
        return values

    @staticmethod
    def validate_poles(text: str) -> tuple[bool, Optional[str]]:
        """
        Check a pole list such as ``-39,-0.1,-1``.

        Returns:
            Tuple of (is_valid, error_message)
        """
        if not text or not text.strip():
            return False, "Pole list is empty"
        try:
            values = PoleParser._split(text)
        except ValueError as e:
            return False, str(e)
        if len(values) != PoleParser.EXPECTED_COUNT:
            return False, f"Expected {PoleParser.EXPECTED_COUNT} poles, got {len(values)}"
        if any(v >= 0 for v in values):
            return False, "Poles must be strictly negative"
        return True, None

    @staticmethod
    def parse_poles(text: str) -> tuple[float, ...]:
        is_valid, error = PoleParser.validate_poles(text)
        if not is_valid:
            raise ValueError(error)
        return tuple(PoleParser._split(text))

    @staticmethod
    def parse_observer_init(text: str) -> Union[str, tuple[float, ...]]:
        """``plant``, ``ambient`` or three comma-separated temperatures."""
        keyword = text.strip().lower()
        if keyword in PoleParser.OBSERVER_INIT_KEYWORDS:
            return keyword
        values = PoleParser._split(text)
        if len(values) != PoleParser.EXPECTED_COUNT:
            raise ValueError(f"Expected 'plant', 'ambient' or {PoleParser.EXPECTED_COUNT} temperatures")
        return tuple(values)

    @staticmethod
    def parse_scale(text: str) -> float:
        value = PoleParser._split(text)
        if len(value) != 1 or not value[0] > 0:
            raise ValueError(f"Pole scale must be one positive number, got '{text}'")
        return value[0]
