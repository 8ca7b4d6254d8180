"""
GCQ CLI 作业模块
每个文件定义一个 BaseJob 子类，由 JobManager 自动发现
"""
