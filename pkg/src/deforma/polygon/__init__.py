"""The polygon method: formulas on tiled spheres and their obstruction expressions."""
