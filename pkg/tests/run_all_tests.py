#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
stratscope 测试框架 - 主测试入口
逐个以子进程运行各测试模块并汇总结果
"""

import argparse
import os
import subprocess
import sys
import time
from typing import Any, Dict, List

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

TEST_MODULES = [
    "test_model",
    "test_ingest",
    "test_prevalence",
    "test_prevalence_properties",
    "test_consolidate",
    "test_alignment",
    "test_alignment_properties",
    "test_patterns",
    "test_report",
    "test_config",
    "test_cli",
]


class TestRunner:
    """测试运行器类"""

    def __init__(self, modules: List[str] = None, verbose: bool = False):
        self.test_modules = list(modules or TEST_MODULES)
        self.verbose = verbose
        self.test_results: Dict[str, Dict[str, Any]] = {}
        self.tests_dir = os.path.dirname(os.path.abspath(__file__))

    def print_banner(self):
        print("\n" + "=" * 50)
        print("         stratscope 测试运行器")
        print("=" * 50)
        print(f"测试目录: {self.tests_dir}")
        print(f"测试模块数量: {len(self.test_modules)}")
        print("=" * 50 + "\n")

    def check_test_file_exists(self, module_name: str) -> bool:
        exists = os.path.exists(os.path.join(self.tests_dir, f"{module_name}.py"))
        if not exists:
            print(f"[ERROR] 测试文件不存在: {module_name}.py")
        return exists

    def run_test_module_as_script(self, module_name: str) -> Dict[str, Any]:
        """以脚本方式运行测试模块 / Run one module in a subprocess"""
        start_time = time.time()
        command = [sys.executable, os.path.join(self.tests_dir, f"{module_name}.py")]
        if self.verbose:
            command.append("-v")

        result = {"module": module_name, "success": False, "duration": 0, "output": ""}
        print(f"[RUN] {module_name}")
        try:
            # unittest reports on stderr, so success is the return code alone
            process = subprocess.run(
                command,
                capture_output=True,
                text=True,
                encoding="utf-8",
                errors="replace",
            )
            result["output"] = process.stdout + process.stderr
            result["success"] = process.returncode == 0
        except OSError as e:
            result["output"] = str(e)
        finally:
            result["duration"] = round(time.time() - start_time, 2)

        if self.verbose or not result["success"]:
            for line in result["output"].splitlines():
                print(f"  {line}")
        return result

    def run_all_tests(self) -> Dict[str, Dict[str, Any]]:
        self.print_banner()
        start_time = time.time()
        for module_name in self.test_modules:
            if not self.check_test_file_exists(module_name):
                self.test_results[module_name] = {"module": module_name, "success": False, "duration": 0, "output": "missing"}
                continue
            result = self.run_test_module_as_script(module_name)
            self.test_results[module_name] = result
            status = "OK" if result["success"] else "ERROR"
            print(f"[{status}] {module_name} ({result['duration']}s)")

        self.generate_report(round(time.time() - start_time, 2))
        return self.test_results

    def generate_report(self, total_time: float):
        """生成测试报告"""
        passed = [m for m, r in self.test_results.items() if r["success"]]
        failed = [m for m, r in self.test_results.items() if not r["success"]]
        print("\n" + "=" * 50)
        print("📋 stratscope 测试报告")
        print("=" * 50)
        print(f"总测试模块: {len(self.test_results)}")
        print(f"通过: {len(passed)}")
        print(f"失败: {len(failed)}")
        print(f"总用时: {total_time} 秒")
        if failed:
            print("\n[ERROR] 失败的测试模块:")
            for module in failed:
                print(f"  - {module}")
        print("\n[TIPS] 单独运行特定测试: python tests/test_module_name.py")
        print("=" * 50)


def main() -> int:
    """主函数"""
    parser = argparse.ArgumentParser(description="stratscope 测试运行器")
    parser.add_argument("-v", "--verbose", action="store_true", help="显示详细输出")
    parser.add_argument("--module", help="只运行指定的测试模块")
    args = parser.parse_args()

    if args.module:
        if args.module not in TEST_MODULES:
            print(f"❌ 未知的测试模块: {args.module}")
            print(f"可用模块: {', '.join(TEST_MODULES)}")
            return 2
        runner = TestRunner([args.module], verbose=args.verbose)
    else:
        runner = TestRunner(verbose=args.verbose)

    results = runner.run_all_tests()
    return 0 if all(r["success"] for r in results.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
