from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("triplel", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("triplel")

nonzero_fractions = st.builds(Fraction, st.integers(-30, 30).filter(bool), st.integers(1, 30))
fractions = st.builds(Fraction, st.integers(-30, 30), st.integers(1, 30))
odd_primes = st.sampled_from([3, 5, 7])


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
