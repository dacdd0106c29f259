# Copyright (c) 2025, Ahmad Hussnain and Contributors
# See license.txt

import inspect
import os
import shutil
import tempfile
import unittest

SLOW_TESTS = os.environ.get("NEEDSTACK_SLOW_TESTS") == "1"


class NeedstackTestCase(unittest.TestCase):
    """Base class for needstack tests: temp workspace and fixture lookup."""

    def setUp(self):
        super().setUp()
        self.tmp_dir = tempfile.mkdtemp(prefix="needstack-test-")
        self.addCleanup(shutil.rmtree, self.tmp_dir, ignore_errors=True)

    def tmp_path(self, name):
        return os.path.join(self.tmp_dir, name)

    def write_file(self, name, content, mode="w"):
        path = self.tmp_path(name)
        if "b" in mode:
            with open(path, mode) as f:
                f.write(content)
        else:
            with open(path, mode, encoding="utf-8") as f:
                f.write(content)
        return path

    def fixture_path(self, name):
        """Resolve `name` beside the module that defines the test class."""
        module_file = inspect.getfile(type(self))
        return os.path.join(os.path.dirname(os.path.abspath(module_file)), name)

    def assertAlmostEqualSeq(self, first, second, places=7):
        self.assertEqual(len(first), len(second))
        for a, b in zip(first, second):
            self.assertAlmostEqual(a, b, places=places)
