"""Dataset ingestion and file formats."""
