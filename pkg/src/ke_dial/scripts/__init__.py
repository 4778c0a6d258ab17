"""Command implementations; ``ke_dial.cli`` wires them into one parser."""
