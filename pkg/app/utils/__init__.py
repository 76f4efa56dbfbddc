"""
Module utils - Briques numériques (fonctions spéciales, quadrature, algèbre linéaire)
"""
