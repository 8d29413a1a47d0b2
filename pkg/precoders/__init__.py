# Precoders: fixed-phase, relaxed, max-min and conventional baselines
