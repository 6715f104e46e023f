# Empty __init__.py file for morphology package
