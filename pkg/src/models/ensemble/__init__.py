# Stacked ensemble package initialization
