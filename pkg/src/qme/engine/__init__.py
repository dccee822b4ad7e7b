"""Assessment engine: normalisation, utilities, weights, aggregation, grades."""
