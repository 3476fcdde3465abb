"""
Командная строка abvr
"""

from abvr.cli.commands import cli, cmd_estimate, cmd_select, cmd_simulate

__all__ = ["cli", "cmd_estimate", "cmd_select", "cmd_simulate"]
