# Empty __init__.py file for models package
