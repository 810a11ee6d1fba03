# Game model, weights, serialization and generators
