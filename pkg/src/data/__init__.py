# Dataset ingestion and preparation package initialization
