"""
Produits de matrices stochastiques aléatoires
Simulation Monte-Carlo, références analytiques et reproduction des figures
"""
