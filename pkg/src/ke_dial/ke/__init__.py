"""KE-DELEX / KE-RELEX: entity matching, templates and binding maps."""
