#!/usr/bin/env python3
"""
Import verification script to check all modules load correctly
"""

MODULES = [
    "config.config",
    "config.run_config",
    "core.tensor",
    "core.ops",
    "core.conv",
    "core.extremum",
    "core.norm",
    "core.gradcheck",
    "models.configs",
    "models.struct_element",
    "models.volume",
    "morphology.flat",
    "morphology.chm",
    "network.morph_block",
    "network.unet",
    "network.loss",
    "network.checkpoint",
    "data.synthetic",
    "data.normalize",
    "data.pgm",
    "data.volume_io",
    "training.metrics",
    "training.trainer",
    "training.fold_manager",
    "handlers.command_factory",
    "utils.helpers",
    "utils.constants",
]


def check_imports():
    """Check all imports work correctly"""
    import importlib

    try:
        print("Checking morphgrad imports...")
        for name in MODULES:
            importlib.import_module(name)
            print(f"✅ {name} imported successfully")

        print("\n🎉 All imports successful!")
        return True

    except ImportError as e:
        print(f"❌ Import error: {e}")
        return False
    except Exception as e:
        print(f"❌ Unexpected error: {e}")
        return False

if __name__ == "__main__":
    check_imports()
