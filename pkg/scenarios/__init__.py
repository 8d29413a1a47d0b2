# Scenarios: configuration schema, built-in experiments and pipelines
