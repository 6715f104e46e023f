# Empty __init__.py file for network package
