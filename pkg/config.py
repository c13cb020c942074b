"""
Configuration settings for the hidden periodic orbits engine
Reads overrides from the environment (and a local .env file)
"""
import os
from typing import List
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _float_list(raw: str) -> List[float]:
    return [float(item.strip()) for item in raw.split(",") if item.strip()]


class Config:
    """Configuration class for the exact engine, the numeric falsifier and the scan"""

    # Debug and Logging
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"
    VERBOSE_LOGGING: bool = os.getenv("VERBOSE_LOGGING", "False").lower() == "true"
    EVENT_LOG_FILE: str = os.getenv("EVENT_LOG_FILE", "engine_events.jsonl")

    # Cyclotomic fields
    MAX_CYCLO_LEVEL: int = int(os.getenv("MAX_CYCLO_LEVEL", "10000"))

    # Truncation policy: D = max(floor, 2M+3), doubled on escalation, never above cap
    TRUNCATION_FLOOR: int = int(os.getenv("TRUNCATION_FLOOR", "16"))
    TRUNCATION_CAP: int = int(os.getenv("TRUNCATION_CAP", "128"))
    MAX_ESCALATIONS: int = int(os.getenv("MAX_ESCALATIONS", "1"))

    # Numeric falsifier defaults
    NUMERIC_EPSILONS: List[float] = _float_list(os.getenv("NUMERIC_EPSILONS", "1e-3,1e-4"))
    NUMERIC_RADIUS: float = float(os.getenv("NUMERIC_RADIUS", "0.35"))
    NUMERIC_STARTS: int = int(os.getenv("NUMERIC_STARTS", "2000"))
    NUMERIC_RESIDUAL_TOL: float = float(os.getenv("NUMERIC_RESIDUAL_TOL", "1e-10"))
    NUMERIC_CLUSTER_TOL: float = float(os.getenv("NUMERIC_CLUSTER_TOL", "1e-6"))
    NUMERIC_NEWTON_STEPS: int = int(os.getenv("NUMERIC_NEWTON_STEPS", "60"))

    # Theorem scan
    SCAN_MAX_LCM: int = int(os.getenv("SCAN_MAX_LCM", "6"))
    SCAN_SAMPLES: int = int(os.getenv("SCAN_SAMPLES", "3"))
    SAMPLE_MAX_DRAWS: int = int(os.getenv("SAMPLE_MAX_DRAWS", "20"))
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "7"))
    THREADS: int = int(os.getenv("THREADS", "1"))

    @classmethod
    def validate(cls) -> bool:
        """Validate configuration settings"""
        warnings = []

        if cls.MAX_CYCLO_LEVEL < 1:
            warnings.append(f"MAX_CYCLO_LEVEL ({cls.MAX_CYCLO_LEVEL}) must be positive")

        if cls.TRUNCATION_FLOOR < 2:
            warnings.append(f"TRUNCATION_FLOOR ({cls.TRUNCATION_FLOOR}) should be at least 2")

        if cls.TRUNCATION_FLOOR > cls.TRUNCATION_CAP:
            warnings.append(
                f"TRUNCATION_FLOOR ({cls.TRUNCATION_FLOOR}) exceeds TRUNCATION_CAP ({cls.TRUNCATION_CAP})"
            )

        if cls.MAX_ESCALATIONS < 0:
            warnings.append(f"MAX_ESCALATIONS ({cls.MAX_ESCALATIONS}) cannot be negative")

        if not cls.NUMERIC_EPSILONS or min(cls.NUMERIC_EPSILONS) <= 0:
            warnings.append("NUMERIC_EPSILONS must be a non-empty list of positive numbers")

        if not 0 < cls.NUMERIC_RESIDUAL_TOL < cls.NUMERIC_CLUSTER_TOL < cls.NUMERIC_RADIUS:
            warnings.append("Numeric tolerances must satisfy 0 < residual < cluster < radius")

        if cls.NUMERIC_STARTS < 1 or cls.NUMERIC_NEWTON_STEPS < 1:
            warnings.append("NUMERIC_STARTS and NUMERIC_NEWTON_STEPS must be positive")

        if cls.THREADS < 1:
            warnings.append(f"THREADS ({cls.THREADS}) must be at least 1")

        if warnings:
            print("Configuration warnings:")
            for warning in warnings:
                print(f"  - {warning}")
            return False

        return True

    @classmethod
    def print_config(cls):
        """Print current configuration"""
        print("Hidden Orbits Engine Configuration:")
        print(f"  Debug Mode: {cls.DEBUG}")
        print(f"  Verbose Logging: {cls.VERBOSE_LOGGING}")
        print(f"  Event Log File: {cls.EVENT_LOG_FILE}")
        print(f"  Max Cyclotomic Level: {cls.MAX_CYCLO_LEVEL}")

        print(f"\n  🧮 Truncation Policy:")
        print(f"  Floor: {cls.TRUNCATION_FLOOR}")
        print(f"  Cap: {cls.TRUNCATION_CAP}")
        print(f"  Max Escalations: {cls.MAX_ESCALATIONS}")

        print(f"\n  🎯 Numeric Falsifier:")
        print(f"  Epsilons: {cls.NUMERIC_EPSILONS}")
        print(f"  Radius: {cls.NUMERIC_RADIUS}")
        print(f"  Starts: {cls.NUMERIC_STARTS}")
        print(f"  Residual / Cluster Tolerance: {cls.NUMERIC_RESIDUAL_TOL} / {cls.NUMERIC_CLUSTER_TOL}")
        print(f"  Newton Steps: {cls.NUMERIC_NEWTON_STEPS}")

        print(f"\n  🔬 Theorem Scan:")
        print(f"  Max lcm: {cls.SCAN_MAX_LCM}")
        print(f"  Samples per cell: {cls.SCAN_SAMPLES}")
        print(f"  Seed: {cls.DEFAULT_SEED}")
        print(f"  Threads: {cls.THREADS}")


# Create global config instance
config = Config()
