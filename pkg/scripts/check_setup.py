#!/usr/bin/env python3
"""
Environment and dependency check with an Example E2 smoke computation
"""

import importlib
import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import config

REQUIRED_PACKAGES = ["sympy", "numpy", "scipy", "pydantic", "dotenv"]


def check_configuration():
    """Check configuration validity"""
    print("🔧 Checking Configuration...")

    if not config.validate():
        print("❌ Configuration has problems (see warnings above)")
        return False

    print("✅ Configuration is valid")
    config.print_config()
    return True


def check_dependencies():
    """Check that every required package imports"""
    print("\n📦 Checking Dependencies...")

    missing = []
    for name in REQUIRED_PACKAGES:
        try:
            module = importlib.import_module(name)
            version = getattr(module, "__version__", "unknown version")
            print(f"✅ {name} {version}")
        except ImportError as e:
            print(f"❌ {name} not importable: {e}")
            missing.append(name)

    if missing:
        print("💡 Install with: pip install -r requirements.txt")
        return False
    return True


def check_exact_field():
    """Check cyclotomic arithmetic on a known identity"""
    print("\n🧮 Checking Cyclotomic Arithmetic...")

    from engine.exactnum import cyclotomic_poly, get_context

    if cyclotomic_poly(12) != (1, 0, -1, 0, 1):
        print(f"❌ Phi_12 came out as {cyclotomic_poly(12)}")
        return False

    context = get_context(3)
    if context.zeta(1) + context.zeta(2) != -1:
        print("❌ zeta_3 + zeta_3^2 != -1")
        return False

    print("✅ Phi_12 = X^4 - X^2 + 1 and zeta_3 + zeta_3^2 = -1")
    return True


def check_example_e2():
    """Smoke test: hidden orbit counts of Example E2 with k = 2"""
    print("\n🔬 Checking Example E2 (k = 2, M = 6)...")

    try:
        from engine.classify import builtin_example
        from engine.dold import dold_report

        report = dold_report(builtin_example("e2", k=2), 6)
        observed = [report.row(m).orbits for m in (1, 2, 3, 6)]
        if observed != [1, 2, 2, 1]:
            print(f"❌ expected O = [1, 2, 2, 1] over m = 1, 2, 3, 6, got {observed}")
            return False

        print(f"✅ O_m over m = 1, 2, 3, 6: {observed}; mu(f^6) = {report.mu_total}")
        return True

    except Exception as e:
        print(f"❌ Example E2 computation failed: {e}")
        return False


def main():
    """Run all checks"""
    print("🚀 Hidden Periodic Orbits Engine - Setup Check")
    print("=" * 60)

    checks = [
        ("Configuration", check_configuration),
        ("Dependencies", check_dependencies),
        ("Cyclotomic Arithmetic", check_exact_field),
        ("Example E2", check_example_e2),
    ]

    results = []

    for check_name, check_func in checks:
        try:
            result = check_func()
            results.append((check_name, result))
        except Exception as e:
            print(f"❌ {check_name} check crashed: {e}")
            results.append((check_name, False))
        print()

    # Summary
    print("=" * 60)
    print("📊 Check Results Summary:")

    all_passed = True
    for check_name, passed in results:
        status = "✅ PASSED" if passed else "❌ FAILED"
        print(f"  {check_name}: {status}")
        if not passed:
            all_passed = False

    print("\n" + "=" * 60)

    if all_passed:
        print("🎉 All checks passed! The engine is ready.")
        print("\nNext steps:")
        print("1. Run 'python hidden_orbits.py example e2 --k 2 -o e2_k2.germ' to write a germ")
        print("2. Run 'python hidden_orbits.py orbits e2_k2.germ --period 6' for its orbit table")
        print("3. Run 'python hidden_orbits.py theorem-scan' for the end-to-end classification check")
    else:
        print("⚠️  Some checks failed. Please fix the issues before proceeding.")
        print("\nTroubleshooting:")
        print("1. Install dependencies with 'pip install -r requirements.txt'")
        print("2. Check your .env values against .env.example")

    return all_passed


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
