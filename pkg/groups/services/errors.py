"""
Base exception shared by every service in the groups app.

Each service module defines its own subclasses next to the code that
raises them; management commands only need to catch FpgError.
"""


class FpgError(Exception):
    """Base exception for finitely presented group toolkit errors"""
    pass
