#!/usr/bin/env python3
"""
Test setup script for spectrum_ledger.

This script checks the setup of the application: Python version,
dependencies, configuration files, directory layout, and that every
bundled scenario parses. Run it directly for a readable report; pytest
collects the ``test_`` functions at the bottom.
"""

import os
import sys
import importlib
from pathlib import Path
from typing import Dict, Any

import yaml

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT))


def check_python_version() -> Dict[str, Any]:
    """Check if Python version is compatible."""
    version = sys.version_info
    if version.major < 3 or (version.major == 3 and version.minor < 8):
        return {
            'success': False,
            'error': f"Python {version.major}.{version.minor} is not supported. Please use Python 3.8 or higher."
        }

    return {
        'success': True,
        'version': f"{version.major}.{version.minor}.{version.micro}"
    }


def check_dependencies() -> Dict[str, Any]:
    """Check if all required dependencies are installed."""
    package_imports = {
        'python-dotenv': 'dotenv',
        'chardet': 'chardet',
        'pyyaml': 'yaml',
        'colorama': 'colorama',
        'pytest': 'pytest',
        'hypothesis': 'hypothesis',
    }

    missing_packages = []
    installed_packages = []

    for package_name, module_name in package_imports.items():
        try:
            importlib.import_module(module_name)
            installed_packages.append(package_name)
        except ImportError:
            missing_packages.append(package_name)

    return {
        'success': len(missing_packages) == 0,
        'installed': installed_packages,
        'missing': missing_packages
    }


def check_configuration_files() -> Dict[str, Any]:
    """Check that the config file exists, parses, and has the expected sections."""
    config_path = Path(os.getenv('SPECTRUM_LEDGER_CONFIG') or ROOT / 'config' / 'config.yaml')

    if not config_path.exists():
        return {'success': False, 'error': f"{config_path} not found"}

    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        return {'success': False, 'error': f"{config_path}: {e}"}

    missing_sections = [s for s in ('app', 'paths', 'logging', 'run', 'fuzz') if s not in config]
    return {
        'success': not missing_sections,
        'path': str(config_path),
        'missing_sections': missing_sections
    }


def check_directory_structure() -> Dict[str, Any]:
    """Check if required directories exist."""
    required_dirs = [
        'src',
        'src/utils',
        'config',
        'data/scenarios',
        'data/fixtures',
    ]

    existing_dirs = []
    missing_dirs = []

    for dir_path in required_dirs:
        path = ROOT / dir_path
        if path.exists() and path.is_dir():
            existing_dirs.append(dir_path)
        else:
            missing_dirs.append(dir_path)

    return {
        'success': len(missing_dirs) == 0,
        'existing': existing_dirs,
        'missing': missing_dirs
    }


def check_scenarios_parse() -> Dict[str, Any]:
    """Parse every bundled scenario file."""
    from src.errors import ParseError
    from src.scenario_runner import parse_scenario
    from src.utils.file_utils import FileUtils

    parsed = []
    broken = []
    for path in FileUtils.get_scenario_files(ROOT / 'data' / 'scenarios'):
        try:
            parse_scenario(FileUtils.read_text_file(path))
            parsed.append(path.name)
        except ParseError as e:
            broken.append(f"{path.name}: {e}")

    return {
        'success': bool(parsed) and not broken,
        'parsed': parsed,
        'broken': broken
    }


def test_python_version():
    assert check_python_version()['success']


def test_dependencies():
    result = check_dependencies()
    assert result['success'], result['missing']


def test_configuration_files():
    result = check_configuration_files()
    assert result['success'], result


def test_directory_structure():
    result = check_directory_structure()
    assert result['success'], result['missing']


def test_scenarios_parse():
    result = check_scenarios_parse()
    assert result['success'], result['broken']


def main():
    """Run all checks and display results."""
    print("🔍 Testing Spectrum Ledger Setup")
    print("=" * 50)

    print("\n1. 🐍 Python Version Check")
    python_check = check_python_version()
    if python_check['success']:
        print(f"   ✅ Python {python_check['version']} - Compatible")
    else:
        print(f"   ❌ {python_check['error']}")

    print("\n2. 📦 Dependencies Check")
    deps_check = check_dependencies()
    if deps_check['success']:
        print(f"   ✅ All {len(deps_check['installed'])} required packages installed")
    else:
        print(f"   ❌ Missing packages: {', '.join(deps_check['missing'])}")
        print("   💡 Run: pip install -r requirements.txt")

    print("\n3. ⚙️ Configuration File Check")
    config_check = check_configuration_files()
    if config_check['success']:
        print(f"   ✅ {config_check['path']} present and valid")
    elif 'error' in config_check:
        print(f"   ❌ {config_check['error']}")
    else:
        print(f"   ❌ Missing sections: {', '.join(config_check['missing_sections'])}")

    print("\n4. 📁 Directory Structure Check")
    dir_check = check_directory_structure()
    if dir_check['success']:
        print(f"   ✅ All {len(dir_check['existing'])} required directories exist")
    else:
        print(f"   ❌ Missing directories: {', '.join(dir_check['missing'])}")

    print("\n5. 📜 Scenario Parse Check")
    if deps_check['success']:
        scenario_check = check_scenarios_parse()
        if scenario_check['success']:
            print(f"   ✅ All {len(scenario_check['parsed'])} bundled scenarios parse")
        else:
            for line in scenario_check['broken'] or ['no scenarios found']:
                print(f"   ❌ {line}")
    else:
        scenario_check = {'success': False}
        print("   ⏭️ Skipped until dependencies are installed")

    print("\n" + "=" * 50)
    print("📊 SETUP SUMMARY")
    print("=" * 50)

    all_checks = [
        ("Python Version", python_check),
        ("Dependencies", deps_check),
        ("Configuration File", config_check),
        ("Directory Structure", dir_check),
        ("Scenario Parse", scenario_check),
    ]

    passed = sum(1 for _, check in all_checks if check['success'])
    total = len(all_checks)

    print(f"✅ Passed: {passed}/{total}")
    print(f"❌ Failed: {total - passed}/{total}")

    if passed == total:
        print("\n🎉 All checks passed! Your setup is ready.")
        print("\n📝 Next steps:")
        print("1. Run: python main.py run data/scenarios/table2.scn")
        print("2. Run: python -m pytest")
        return 0

    print("\n⚠️ Some checks failed. Please fix the issues above.")
    print("\n🔧 Common fixes:")
    print("1. Install missing dependencies: pip install -r requirements.txt")
    print("2. Restore config/config.yaml from version control")
    return 1


if __name__ == "__main__":
    sys.exit(main())
