"""Shared exception hierarchy.

Modules define their own subclasses; the CLI maps these bases to exit codes.
"""


class KgqaError(Exception):
    """Base class for all package errors."""


class ConfigError(KgqaError):
    """Invalid, missing, or inconsistent run configuration."""


class DataError(KgqaError):
    """Malformed input data: KG files, datasets, drafts, fixtures."""


class TransportError(KgqaError):
    """A remote call (SPARQL endpoint, LLM service) failed in transit.

    Distinct from an empty result: transport failures must never be
    silently converted into empty answers.
    """
