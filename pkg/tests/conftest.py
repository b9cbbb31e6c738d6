import time

SESSION_START = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # acceptance runs last so its final criterion can time the whole suite
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")
