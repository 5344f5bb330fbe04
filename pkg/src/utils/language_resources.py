#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
语言资源模块 - 提供CLI消息的多语言支持
Language resources - localised CLI messages

Report documents are rendered in English only; this catalogue covers what the CLI
prints to the terminal.
"""

from typing import Any, Dict

DEFAULT_LANGUAGE = "en"

# 语言资源字典
LANGUAGE_RESOURCES: Dict[str, Dict[str, Any]] = {
    "en": {
        "config_unknown_key": "Ignoring unknown configuration key: {}",
        "config_invalid": "Invalid configuration: {}",
        "data_dir_missing": "No data directory given: pass --data-dir or set STRATSCOPE_DATA_DIR",
        "out_dir_unwritable": "Output directory is not writable: {}",
        "dataset_valid": "Dataset is valid: {} indicators, {} countries, {} matches, {} axes, {} correspondences",
        "dataset_invalid": "Dataset has {} problem(s):",
        "missing_file": "Required file missing: {}",
        "io_error": "I/O error: {}",
        "usage_error": "Usage error: {}",
        "analysis_error": "Analysis failed: {}",
        "stage_header": "== {} ==",
        "report_written": "Wrote {} report files to {}",
        "erratum_detected": "Erratum check: {} is printed as {} but derives to {}",
        "no_rows": "(no rows)",
    },
    "zh": {
        "config_unknown_key": "忽略未知配置项: {}",
        "config_invalid": "配置无效: {}",
        "data_dir_missing": "未指定数据目录：请使用 --data-dir 或设置 STRATSCOPE_DATA_DIR",
        "out_dir_unwritable": "输出目录不可写: {}",
        "dataset_valid": "数据集有效: {} 个指标, {} 个国家, {} 条匹配, {} 个轴, {} 条对应",
        "dataset_invalid": "数据集存在 {} 个问题:",
        "missing_file": "缺少必需文件: {}",
        "io_error": "I/O错误: {}",
        "usage_error": "用法错误: {}",
        "analysis_error": "分析失败: {}",
        "stage_header": "== {} ==",
        "report_written": "已写入 {} 个报告文件到 {}",
        "erratum_detected": "勘误检查: {} 印刷值为 {}，推导值为 {}",
        "no_rows": "（无数据）",
    },
}


class LanguageManager:
    """
    语言管理器类，用于处理多语言支持
    Language manager for CLI messages
    """

    def __init__(self, language: str = DEFAULT_LANGUAGE):
        self.language = DEFAULT_LANGUAGE
        self.resources = LANGUAGE_RESOURCES[DEFAULT_LANGUAGE]
        self.set_language(language)

    def set_language(self, language: str) -> None:
        """
        设置当前语言；未知语言回退到英文
        Set the current language; unknown codes fall back to English
        """
        if language in LANGUAGE_RESOURCES:
            self.language = language
        else:
            self.language = DEFAULT_LANGUAGE
        self.resources = LANGUAGE_RESOURCES[self.language]

    def get(self, key: str, *args, **kwargs) -> str:
        """
        获取指定键的翻译文本
        Return the text for ``key``, formatted with the given arguments
        """
        text = self.resources.get(key, LANGUAGE_RESOURCES[DEFAULT_LANGUAGE].get(key, key))
        if args or kwargs:
            return text.format(*args, **kwargs)
        return text

    def get_language(self) -> str:
        return self.language


# 创建全局语言管理器实例
global_language_manager = LanguageManager()


def get_text(key: str, *args, **kwargs) -> str:
    """获取翻译文本的便捷函数 / Convenience lookup on the global manager"""
    return global_language_manager.get(key, *args, **kwargs)


def set_language(language: str) -> None:
    """设置全局语言 / Set the global language"""
    global_language_manager.set_language(language)


def get_available_languages() -> list:
    """获取可用的语言列表 / Available language codes"""
    return sorted(LANGUAGE_RESOURCES.keys())
