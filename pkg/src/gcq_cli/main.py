"""
GCQ CLI 主入口文件
"""

import os

from .commands import app
from .utils import get_current_working_directory


def main():
    """主入口函数"""
    # 作业按命令执行目录解析相对路径
    os.environ["GCQ_CURRENT_DIR"] = str(get_current_working_directory())

    app()


if __name__ == "__main__":
    main()
