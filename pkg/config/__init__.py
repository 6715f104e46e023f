# Empty __init__.py file for config package
