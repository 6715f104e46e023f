# Empty __init__.py file for training package
