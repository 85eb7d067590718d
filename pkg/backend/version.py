"""
FPG Toolkit Version Information
"""

# Semantic version - update this manually on releases
VERSION = "0.4.0"

TOOL_NAME = "fpg-toolkit"


def get_version():
    """Get the version string."""
    return VERSION
