# Loaders: result tables and CSV output
